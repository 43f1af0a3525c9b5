from .app import DEFAULT_PORT, create_app, seed_builtin_maps

__all__ = ["DEFAULT_PORT", "create_app", "seed_builtin_maps"]
