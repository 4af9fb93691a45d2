"""
Health Check Routes
"""
from fastapi import APIRouter, status
from datetime import datetime

from config.settings import get_settings

router = APIRouter(tags=["Health"])


@router.get("/health", status_code=status.HTTP_200_OK)
async def health_check():
    """
    Health check endpoint
    """
    settings = get_settings()
    return {
        "status": "healthy",
        "timestamp": datetime.utcnow().isoformat(),
        "service": settings.app_name,
        "version": settings.app_version,
        "limits": {
            "cap": settings.cap,
            "kmax": settings.kmax,
            "precision_bits": settings.precision_bits,
        },
    }
