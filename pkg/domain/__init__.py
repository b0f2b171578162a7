"""
Domain layer: entities, models, repositories and services.
"""
