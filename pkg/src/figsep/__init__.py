"""figsep: compound scientific figure separation guided by subfigure labels."""

__version__ = "0.1.0"
