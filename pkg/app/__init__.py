"""
Optomechanical cat-state simulator - CLI and HTTP application package.
"""
