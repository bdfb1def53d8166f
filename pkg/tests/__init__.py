"""
Test suite for the symbiotic branching lab.

Tests are organized into:
    unit/: Closed-form and oracle checks of individual modules
    integration/: End-to-end runs of the symbranch command
"""
