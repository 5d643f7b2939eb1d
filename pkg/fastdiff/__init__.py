_program = "fastdiff"
__version__ = "1.0"


__all__ = [
    "input_parsing",
    "analysis_functions",
    "output_options",
    "report_functions",
    "utils"]
