from .experiment import ALGORITHMS, compare_report, opt_offline, run_experiment, summarize
from .generate import GenSpec, generate
from .instance_io import SchemaError, instance_from_document, instance_to_document, load_instance, read_instance
from .tracefile import parse_trace, read_trace, trace_to_csv, write_trace

__all__ = [
    "ALGORITHMS",
    "GenSpec",
    "SchemaError",
    "compare_report",
    "generate",
    "instance_from_document",
    "instance_to_document",
    "load_instance",
    "opt_offline",
    "parse_trace",
    "read_instance",
    "read_trace",
    "run_experiment",
    "summarize",
    "trace_to_csv",
    "write_trace",
]
