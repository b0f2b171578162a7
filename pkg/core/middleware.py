"""
Request timing middleware.
"""

import time

from fastapi import Request
from starlette.middleware.base import BaseHTTPMiddleware

from core.config import settings
from core.logging import get_logger, log_request_info

logger = get_logger(__name__)

TIMING_HEADER = "X-Compute-Time-Ms"


class TimingMiddleware(BaseHTTPMiddleware):
    """Stamp every response with its wall time; simulations can take seconds."""

    async def dispatch(self, request: Request, call_next):
        start_time = time.time()

        if settings.debug:
            logger.debug(
                "HTTP request started",
                method=request.method,
                path=str(request.url.path),
                query_params=dict(request.query_params),
            )

        try:
            response = await call_next(request)
        except Exception as e:
            duration = time.time() - start_time
            logger.error(
                "HTTP request failed",
                method=request.method,
                path=str(request.url.path),
                error=str(e),
                duration_ms=round(duration * 1000, 2),
                exc_info=True,
            )
            raise

        duration = time.time() - start_time
        response.headers[TIMING_HEADER] = f"{duration * 1000:.2f}"
        log_request_info(
            logger=logger,
            method=request.method,
            path=str(request.url.path),
            status_code=response.status_code,
            duration=duration,
        )
        return response
