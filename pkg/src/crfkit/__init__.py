"""crfkit: exact symbolic workbench for generalized CRF-type structures."""

__version__ = "0.1.0"
