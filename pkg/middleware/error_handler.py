"""
Error Handler Middleware
"""
from datetime import datetime

from fastapi import Request, status
from fastapi.responses import JSONResponse
import structlog

from blockmass.errors import BlockMassError

logger = structlog.get_logger()


def error_response(status_code: int, error_code: str, message: str) -> JSONResponse:
    """Cuerpo de error común: error_code, message, timestamp"""
    return JSONResponse(
        status_code=status_code,
        content={
            "error_code": error_code,
            "message": message,
            "timestamp": datetime.utcnow().isoformat()
        }
    )


async def error_handler_middleware(request: Request, call_next):
    """
    Middleware para manejo de errores que escapan a los exception handlers
    """
    try:
        return await call_next(request)
    except BlockMassError as exc:
        logger.warning("request_rejected", path=request.url.path, error_code=exc.error_code)
        return error_response(exc.status_code, exc.error_code, exc.message)
    except Exception as exc:
        logger.error(
            "unhandled_error",
            error=str(exc),
            path=request.url.path,
            method=request.method
        )
        debug = request.app.state.settings.debug
        return error_response(
            status.HTTP_500_INTERNAL_SERVER_ERROR,
            "INTERNAL_SERVER_ERROR",
            str(exc) if debug else "An error occurred",
        )
