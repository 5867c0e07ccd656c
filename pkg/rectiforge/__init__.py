# Include some shortcuts

from .rectiforge import RectiForge, SolverException
from .common.config.parseconfig import load_params
from .netlist import parse, load_netlist
