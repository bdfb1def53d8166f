"""End-to-end tests of the symbranch command."""
