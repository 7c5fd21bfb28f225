"""bridgecraft: bridges between encryption schemes, with the schemes and games around them."""

__version__ = "0.1.0"
