import os as _os

_packaged = _os.path.join(_os.path.dirname(__file__), "data")
if "YOSHIDALAB_DATA" not in _os.environ and _os.path.isdir(_packaged):
    _os.environ["YOSHIDALAB_DATA"] = _packaged

from ._core import (
    Error,
    build_lift,
    bundled_record,
    check_conditions,
    criterion_ids,
    data_dir,
    detect_rational,
    elliptic_ap,
    eta_expansion,
    ratio_identity_check,
    run_criterion,
    validate_record,
)

__all__ = [
    "Error",
    "build_lift",
    "bundled_record",
    "check_conditions",
    "criterion_ids",
    "data_dir",
    "detect_rational",
    "elliptic_ap",
    "eta_expansion",
    "ratio_identity_check",
    "run_criterion",
    "validate_record",
]
