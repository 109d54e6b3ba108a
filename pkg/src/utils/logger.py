"""
src/utils/logger.py
ตัวช่วยสร้าง Logger ที่ใช้ร่วมกันทุกโมดูล (ป้องกัน Handler ซ้ำเวลา import หลายรอบ)
"""

import logging

LOG_FORMAT = '%(levelname)s - %(message)s'
PACKAGE_LOGGERS = ("Dielectric", "Reflection", "Measurement", "Fitting", "Materials", "CLI")


def setup_logger(name: str, level: int = logging.INFO) -> logging.Logger:
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.setLevel(level)
    return logger


def set_package_level(level: int) -> None:
    """ปรับระดับ log ของทุกโมดูลพร้อมกัน (ใช้ตอน CLI ได้รับ --verbose / --quiet)"""
    for name in PACKAGE_LOGGERS:
        setup_logger(name).setLevel(level)
