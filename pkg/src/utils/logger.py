#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
日誌配置模組
pension_sim 的統一日誌設置：控制台輸出到 stderr（stdout 保留給結果），
可選擇寫入 logs/pension_sim.log
"""

import logging
import sys
from pathlib import Path
from typing import Optional
from ..core.config import config_manager

# 本套件日誌器的名稱前綴（模組以 setup_logger(__name__) 建立）
PACKAGE_NAMESPACE = 'src'
DEFAULT_LOG_FILE = 'logs/pension_sim.log'
DEFAULT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _level_of(level: str) -> int:
    return getattr(logging, level.upper())


def setup_logger(
    name: str,
    level: str = None,
    log_file: Optional[str] = None,
    format_string: Optional[str] = None
) -> logging.Logger:
    """
    建立模擬器模組的日誌器

    Args:
        name: 日誌器名稱（通常為模組 __name__）
        level: 日誌級別，預設取 config 的 logging.level
        log_file: 日誌檔案路徑（空字串表示不寫檔），預設取 logging.file
        format_string: 日誌格式字串

    Returns:
        配置好的日誌器；日誌檔無法建立時只保留控制台輸出並發出警告
    """
    logging_config = config_manager.get_logging_config()

    if level is None:
        level = logging_config.get('level', 'INFO')
    if log_file is None:
        log_file = logging_config.get('file', DEFAULT_LOG_FILE)
    if format_string is None:
        format_string = logging_config.get('format', DEFAULT_FORMAT)

    logger = logging.getLogger(name)
    logger.setLevel(_level_of(level))

    # 避免重複添加handler
    if logger.handlers:
        return logger

    formatter = logging.Formatter(format_string)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(_level_of(level))
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        try:
            log_path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_path, encoding='utf-8')
        except OSError as e:
            logger.warning(f"⚠️ 無法寫入日誌檔 {log_path}，僅輸出到控制台: {e}")
        else:
            file_handler.setLevel(_level_of(level))
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    return logger


def set_log_level(logger: logging.Logger, level: str):
    """設定日誌器及其所有 handler 的級別"""
    logger.setLevel(_level_of(level))
    for handler in logger.handlers:
        handler.setLevel(_level_of(level))


def set_global_level(level: str):
    """調整本套件所有已建立日誌器的級別（CLI --log-level 使用）"""
    for name, logger in logging.Logger.manager.loggerDict.items():
        if isinstance(logger, logging.Logger) and name.split('.')[0] == PACKAGE_NAMESPACE:
            set_log_level(logger, level)
