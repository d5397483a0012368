import math

from rich.text import Text

# --- Number Formatting ---
# Machine output uses a fixed significant-digit format so that identical runs
# give byte-identical files.
DEFAULT_SIGNIFICANT_DIGITS = 17

# Styles for human-facing tables
VALUE_STYLES = {
    "positive": "green",
    "negative": "red",
    "zero": "dim",
    "nan": "bright_black",
}
FLAG_STYLE = "yellow"


def format_float(value: float, digits: int = DEFAULT_SIGNIFICANT_DIGITS) -> str:
    """Deterministic '%.{digits}g' rendering; 'nan', 'inf' and '-inf' for non-finite values."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0.0:
        # drop the sign of negative zero
        return "0"
    return f"{value:.{digits}g}"


def styled_value(value: float, digits: int = 6) -> Text:
    """Applies sign coloring to a number using Rich Text."""
    value = float(value)
    if math.isnan(value):
        style = VALUE_STYLES["nan"]
    elif value > 0:
        style = VALUE_STYLES["positive"]
    elif value < 0:
        style = VALUE_STYLES["negative"]
    else:
        style = VALUE_STYLES["zero"]
    return Text(format_float(value, digits), style=style)


def styled_flag(flag: str) -> Text:
    if not flag:
        return Text("")
    return Text(flag, style=FLAG_STYLE)


def styled_check(passed: bool) -> Text:
    return Text("yes", style="bold green") if passed else Text("no", style="bold red")
