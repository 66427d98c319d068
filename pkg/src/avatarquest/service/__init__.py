from .app import GameService, create_app

__all__ = ["GameService", "create_app"]
