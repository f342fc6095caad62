#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
配置管理模組
統一管理系統配置與內建情境預設
"""

import copy
import os
from typing import Dict, Any, List, Optional
from pathlib import Path

import yaml

# 專案根目錄下的 config/
DEFAULT_CONFIG_DIR = Path(__file__).resolve().parents[2] / "config"

# 限制工作進程數的環境變數
MAX_WORKERS_ENV = "PENSION_SIM_MAX_WORKERS"


class ConfigManager:
    """配置管理器"""

    def __init__(self, config_dir: Optional[str] = None):
        """初始化配置管理器"""
        self.config_dir = Path(config_dir) if config_dir else DEFAULT_CONFIG_DIR
        self._config_cache: Dict[str, Any] = {}
        self._load_all_configs()

    def _load_all_configs(self):
        """載入所有配置檔案"""
        # 載入系統預設配置
        default_config_path = self.config_dir / "default_config.yaml"
        if default_config_path.exists():
            self._config_cache.update(self._load_yaml_file(default_config_path))

        # 載入情境預設
        presets_config_path = self.config_dir / "presets_config.yaml"
        if presets_config_path.exists():
            self._config_cache.update(self._load_yaml_file(presets_config_path))

    def _load_yaml_file(self, file_path: Path) -> Dict[str, Any]:
        """載入YAML配置檔案"""
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                return yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            # 日誌器依賴本模組，這裡只能直接輸出
            print(f"Failed to load config file {file_path}: {e}")
            return {}

    def get(self, key: str, default: Any = None) -> Any:
        """獲取配置值（支援以點分隔的鍵）"""
        keys = key.split('.')
        value = self._config_cache

        try:
            for k in keys:
                value = value[k]
            return value
        except (KeyError, TypeError):
            return default

    def get_logging_config(self) -> Dict[str, Any]:
        """獲取日誌配置"""
        return self.get('logging', {
            'level': 'INFO',
            'file': 'logs/pension_sim.log',
            'format': '%(asctime)s - %(levelname)s - %(message)s'
        })

    def get_output_config(self) -> Dict[str, Any]:
        """獲取輸出配置"""
        return self.get('output', {
            'directory': 'results/',
            'float_format': '%.17g',
            'write_paths': False
        })

    def get_harness_config(self) -> Dict[str, Any]:
        """獲取蒙地卡羅執行配置（並套用工作進程上限環境變數）"""
        harness = dict(self.get('harness', {
            'chunk_size': 128,
            'max_workers': None,
            'error_policy': 'fail_fast',
            'preset_ranking_paths': 100
        }))
        env_cap = os.environ.get(MAX_WORKERS_ENV)
        if env_cap:
            try:
                cap = max(int(env_cap), 1)
            except ValueError:
                cap = None
            if cap is not None:
                current = harness.get('max_workers')
                harness['max_workers'] = cap if current is None else min(int(current), cap)
        return harness

    def get_reporting_config(self) -> Dict[str, Any]:
        """獲取報告時間網格配置"""
        return self.get('reporting', {
            'series_step_years': 1.0,
            'eair_times': [10, 20, 30, 40],
            'histogram_times': [20],
            'histogram_bins': 'fd',
            'solvency_threshold': 1e-9,
            'standardized_time': 30
        })

    def get_calibration_config(self) -> Dict[str, Any]:
        """獲取 Z^u_0 校準與掃描配置"""
        return self.get('calibration', {
            'default_target': 0.05,
            'zu0_grid': [1296, 2000, 3000, 4500, 6500, 9000, 12000, 14727, 18000, 22000, 27000, 33000]
        })

    def get_crosscheck_config(self) -> Dict[str, Any]:
        """獲取 SDE 交叉驗證配置"""
        return self.get('crosscheck', {
            'tolerance': 0.01,
            'window_fraction': 0.9,
            'zu_cutoff': 1e-12
        })

    def list_presets(self) -> List[str]:
        """列出所有內建情境名稱"""
        return sorted((self.get('presets') or {}).keys())

    def get_preset(self, name: str) -> Optional[Dict[str, Any]]:
        """獲取指定情境預設（回傳深拷貝）"""
        preset = (self.get('presets') or {}).get(name)
        return copy.deepcopy(preset) if preset is not None else None

    def get_preset_description(self, name: str) -> str:
        """獲取情境預設說明"""
        return (self.get('preset_descriptions') or {}).get(name, '')


# 全域配置實例
config_manager = ConfigManager()
