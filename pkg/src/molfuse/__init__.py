"""molfuse: molecular property prediction that fuses graph structure with
chemist-knowledge text through a gated cross-attention block."""

__version__ = "0.1.0"
