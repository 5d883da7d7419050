"""Command-line surface: ``etp-sim run | validate | version``."""
