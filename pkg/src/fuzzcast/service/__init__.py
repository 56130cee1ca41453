from .app import app, compute_richness, create_app

__all__ = ["app", "compute_richness", "create_app"]
