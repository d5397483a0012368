"""twosite: heat transport through two coupled sites attached to dephasing baths.

Global, local and classical master equations for a two-site system, with
steady states, time evolution and bath heat currents.
"""

__version__ = "0.1.0"
