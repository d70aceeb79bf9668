"""HNRank - Node influence ranking with calibratable Hetero-NodeRank."""

__version__ = "0.1.0"
__author__ = "HNRank Team"
__email__ = "contact@example.com"
