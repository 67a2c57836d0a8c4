from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

import essence_kit.logconf  # noqa: F401  configures the root logger
from backend.routes import reports
from essence_kit import __version__
from essence_kit.config import Settings, get_settings


def create_app(settings: Settings | None = None) -> FastAPI:
    settings = settings or get_settings()
    app = FastAPI(
        title="essence-kit",
        version=__version__,
        description="Essence, Goeritz and cap-search reports for spanning surfaces of link diagrams",
    )
    app.add_middleware(
        CORSMiddleware,
        allow_origins=settings.cors_origins,  # ESSENCE_KIT_CORS_ORIGINS='["https://..."]'
        allow_credentials=False,
        allow_methods=["GET", "POST"],
        allow_headers=["Content-Type"],
    )
    app.include_router(reports.router)
    return app


app = create_app()
