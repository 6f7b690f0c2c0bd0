"""Python bindings for the maldist C++ core."""

try:
    from . import _maldist
except ImportError:  # built in-tree, module on PYTHONPATH
    import _maldist

Set = _maldist.Set
Lscsm = _maldist.Lscsm
Gap = _maldist.Gap
Witness = _maldist.Witness
MaldistError = _maldist.MaldistError
ParseError = _maldist.ParseError
InvalidArgument = _maldist.InvalidArgument
eval_phi = _maldist.eval_phi
gap_to_intervals = _maldist.gap_to_intervals
check_condition2 = _maldist.check_condition2
gap_from_lscsm = _maldist.gap_from_lscsm
run_cli = _maldist.run_cli

__all__ = [
    "Set", "Lscsm", "Gap", "Witness", "MaldistError", "ParseError", "InvalidArgument",
    "eval_phi", "gap_to_intervals", "check_condition2", "gap_from_lscsm", "run_cli",
]
