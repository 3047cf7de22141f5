import sys


def print_progress(iteration, total, prefix="", suffix="", decimals=1, bar_length=50):
    """Draws a terminal progress bar on stderr, one call per finished step."""
    total = max(total, 1)
    percents = f"{100 * (iteration / float(total)):.{decimals}f}"
    filled_length = int(round(bar_length * iteration / float(total)))
    bar = "\033[32m█\033[0m" * filled_length + "\033[31m-\033[0m" * (bar_length - filled_length)

    sys.stderr.write(f"\r{prefix: <16} {bar} {percents}% {suffix}")

    if iteration >= total:
        sys.stderr.write("\n")
    sys.stderr.flush()
