"""
src/utils/config.py
โหลดไฟล์ตั้งค่า config.yaml แล้วแปลงเป็น Config DTO

ค่าที่ไม่ได้ระบุใน YAML จะใช้ค่า default ของ dataclass ปลายทาง
"""

__version__ = "1.0.0"

import os
from typing import Any, Dict, Optional

import yaml

DEFAULT_CONFIG_PATH = 'config.yaml'


def load_config(file_path: str = DEFAULT_CONFIG_PATH) -> Dict[str, Any]:
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Config file not found: {file_path}")
    with open(file_path, 'r', encoding='utf-8') as file:
        cfg = yaml.safe_load(file)
    if cfg is None:
        return {}
    if not isinstance(cfg, dict):
        raise ValueError(f"Config file {file_path} must contain a mapping of sections")
    return cfg


def load_config_or_default(file_path: Optional[str]) -> Dict[str, Any]:
    """
    path ที่ผู้ใช้ระบุเองต้องมีอยู่จริง (ไม่งั้น FileNotFoundError)
    ถ้าไม่ได้ระบุและไม่มี config.yaml ในโฟลเดอร์ปัจจุบัน ให้คืน dict ว่าง = ใช้ค่า default
    """
    if file_path is not None:
        return load_config(file_path)
    if os.path.exists(DEFAULT_CONFIG_PATH):
        return load_config(DEFAULT_CONFIG_PATH)
    return {}


def section(cfg: Dict[str, Any], name: str) -> Dict[str, Any]:
    value = cfg.get(name) or {}
    if not isinstance(value, dict):
        raise ValueError(f"Config section '{name}' must be a mapping")
    return value
