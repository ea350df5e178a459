"""S-machines, Turing-machine surgery, group presentations and a rewriting lab."""

__version__ = "0.1.0"
