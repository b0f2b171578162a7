"""
Cross-cutting configuration, logging and physical constants.
"""
