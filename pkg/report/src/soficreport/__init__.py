"""Offline figures and markdown summaries from soficlab's delimited artifacts."""

__version__ = "0.1.0"
