"""Demonstration-count and DOF studies, with plots written to ./eval_out.

This is the same run as ``compliantlfd eval`` at its defaults and takes
about half a minute.
"""
import sys

from compliantlfd.cli import main

sys.exit(main(["eval", "--out", "eval_out"] + sys.argv[1:]))
