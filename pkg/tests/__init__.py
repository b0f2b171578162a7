"""
Test package for the cat-state simulator.
"""
