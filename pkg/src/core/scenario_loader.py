#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
情境配置載入模組
解析 YAML 情境文件（嚴格模式）、載入內建預設並序列化 ScenarioConfig
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from .config import config_manager
from ..demographics import create_schedule
from ..models.enums import OmegaKind
from ..models.errors import ConfigValidationError, PensionSimError
from ..models.params import (
    CorrelationStructure, MarketParams, PensionParams, PreferenceParams, ScenarioConfig, TimeGrid,
)
from ..utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)

REQUIRED = object()

# 區段 → {鍵: 預設值}；REQUIRED 表示必填
SCHEMA: Dict[str, Dict[str, Any]] = {
    'market': {
        'mu_premium': REQUIRED, 's0': REQUIRED, 'nu0': REQUIRED, 'nu_bar': REQUIRED,
        'kappa': REQUIRED, 'sigma_nu': REQUIRED, 'r0': REQUIRED, 'a': REQUIRED, 'b': REQUIRED,
        'sigma_r': REQUIRED, 'e0': REQUIRED, 'wage_drift': REQUIRED, 'sigma_e': REQUIRED,
    },
    'correlation': {
        'rho_s_nu': 0.0, 'rho_s_r': 0.0, 'rho_s_e': 0.0,
        'rho_nu_r': 0.0, 'rho_nu_e': 0.0, 'rho_r_e': 0.0,
    },
    'pension': {'alpha': REQUIRED, 'k0': 0.0},
    'preferences': {
        'theta': REQUIRED, 'beta': REQUIRED, 'z0': REQUIRED, 'zu0': REQUIRED,
        'delta': REQUIRED, 'omega_kind': OmegaKind.EQUAL_WEIGHT.value,
    },
    'grid': {'horizon_years': REQUIRED, 'steps_per_year': 120},
    'simulation': {'f0': REQUIRED, 'n_paths': REQUIRED, 'master_seed': REQUIRED},
}
SECTIONS = ('market', 'correlation', 'demographics', 'pension', 'preferences', 'grid', 'simulation')
INTEGER_KEYS = {'grid.steps_per_year', 'simulation.n_paths', 'simulation.master_seed'}


def _key_lines(text: str) -> Dict[str, int]:
    """以 yaml.compose 建立「點分隔鍵 → 行號（從 1 起算）」對照表"""
    lines: Dict[str, int] = {}
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return lines

    def walk(node: Any, prefix: str):
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                dotted = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
                lines[dotted] = key_node.start_mark.line + 1
                walk(value_node, dotted)

    walk(root, '')
    return lines


def _check_number(value: Any, dotted: str, integer: bool = False) -> Union[int, float]:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(f"expected a number, got {value!r}", key=dotted)
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigValidationError(f"expected an integer, got {value!r}", key=dotted)
        return int(value)
    return float(value)


def _section_values(document: Dict[str, Any], section: str) -> Dict[str, Any]:
    """依 SCHEMA 取出區段值：拒絕未知鍵、補上文件化的預設值"""
    schema = SCHEMA[section]
    raw = document.get(section)
    # 全部鍵皆有預設值的區段可省略
    if raw is None and REQUIRED not in schema.values():
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigValidationError("missing or malformed section", key=section)
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigValidationError("unknown key", key=f"{section}.{unknown[0]}")

    values = {}
    for key, default in schema.items():
        dotted = f"{section}.{key}"
        if key not in raw:
            if default is REQUIRED:
                raise ConfigValidationError("missing required key", key=dotted)
            values[key] = default
            continue
        value = raw[key]
        if key == 'delta':
            if not isinstance(value, (list, tuple)) or len(value) != 4:
                raise ConfigValidationError("delta must be a list of 4 numbers [S, nu, r, e]", key=dotted)
            values[key] = tuple(_check_number(v, dotted) for v in value)
        elif key == 'omega_kind':
            values[key] = value
        else:
            values[key] = _check_number(value, dotted, integer=dotted in INTEGER_KEYS)
    return values


def build_config(document: Dict[str, Any]) -> ScenarioConfig:
    """
    由情境文件（dict）建立並驗證 ScenarioConfig

    Raises:
        ConfigValidationError: 未知鍵、缺少必填鍵或違反任何不變量
    """
    if not isinstance(document, dict):
        raise ConfigValidationError("scenario document must be a mapping")
    unknown = sorted(set(document) - set(SECTIONS))
    if unknown:
        raise ConfigValidationError("unknown section", key=unknown[0])

    demographics = document.get('demographics')
    if not isinstance(demographics, dict):
        raise ConfigValidationError("missing or malformed section", key='demographics')

    try:
        market = MarketParams(**_section_values(document, 'market'))
        correlation = CorrelationStructure(**_section_values(document, 'correlation'))
        demo = create_schedule(demographics)
        pension = PensionParams(**_section_values(document, 'pension'))
        prefs = PreferenceParams(**_section_values(document, 'preferences'))
        grid = TimeGrid(**_section_values(document, 'grid'))
        simulation = _section_values(document, 'simulation')
        return ScenarioConfig(market=market, correlation=correlation, demo=demo, pension=pension,
                              prefs=prefs, grid=grid, **simulation)
    except ConfigValidationError:
        raise
    except PensionSimError as e:
        # 例如相關係數矩陣非正定
        raise ConfigValidationError(str(e), key='correlation') from e


def parse_config_text(text: str, source: str = '<string>') -> ScenarioConfig:
    """解析 YAML 文字；錯誤訊息附帶行號"""
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigValidationError(f"YAML parse error in {source}: {getattr(e, 'problem', e)}",
                                    line=line) from None
    try:
        return build_config(document)
    except ConfigValidationError as e:
        if e.key and e.line is None:
            line = _key_lines(text).get(e.key) or _key_lines(text).get(e.key.split('[')[0])
            if line is not None:
                raise ConfigValidationError(e.message, key=e.key, line=line) from None
        raise


def parse_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    讀取並驗證情境配置檔

    Raises:
        ConfigValidationError: 解析或驗證失敗（含行號/鍵）
        OSError: 檔案無法讀取
    """
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    config = parse_config_text(text, source=str(path))
    logger.info(f"📄 已載入情境配置: {path}")
    return config


def load_preset(name: str) -> ScenarioConfig:
    """載入內建情境預設"""
    document = config_manager.get_preset(name)
    if document is None:
        raise ConfigValidationError(f"unknown preset '{name}' (available: {', '.join(config_manager.list_presets())})",
                                    key='preset')
    return build_config(document)


def resolve_scenario(source: str) -> Tuple[ScenarioConfig, str]:
    """情境來源可為預設名稱或 YAML 檔路徑，回傳 (配置, 標籤)"""
    if source in config_manager.list_presets():
        return load_preset(source), source
    path = Path(source)
    if path.exists():
        return parse_config(path), path.stem
    raise ConfigValidationError(f"'{source}' is neither a preset nor a readable file", key='scenario')


def serialize_config(config: ScenarioConfig) -> Dict[str, Any]:
    """ScenarioConfig → 情境文件（與 parse 互為反函數）"""
    m, c, p, pr, g = config.market, config.correlation, config.pension, config.prefs, config.grid
    return {
        'market': {key: float(getattr(m, key)) for key in SCHEMA['market']},
        'correlation': {key: float(getattr(c, key)) for key in SCHEMA['correlation']},
        'demographics': config.demo.to_dict(),
        'pension': {'alpha': float(p.alpha), 'k0': float(p.k0)},
        'preferences': {
            'theta': float(pr.theta), 'beta': float(pr.beta), 'z0': float(pr.z0), 'zu0': float(pr.zu0),
            'delta': [float(d) for d in pr.delta], 'omega_kind': pr.omega_kind.value,
        },
        'grid': {'horizon_years': float(g.horizon_years), 'steps_per_year': int(g.steps_per_year)},
        'simulation': {'f0': float(config.f0), 'n_paths': int(config.n_paths),
                       'master_seed': int(config.master_seed)},
    }


def dump_config(config: ScenarioConfig) -> str:
    """序列化為 YAML 文字"""
    return yaml.safe_dump(serialize_config(config), sort_keys=False, allow_unicode=True)


def config_hash(config: ScenarioConfig) -> str:
    """配置的 SHA-256（正規化 JSON）"""
    canonical = json.dumps(serialize_config(config), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def preset_summary(name: str) -> Optional[Dict[str, Any]]:
    """預設情境的簡要說明（CLI presets 使用）"""
    document = config_manager.get_preset(name)
    if document is None:
        return None
    return {
        'name': name,
        'description': config_manager.get_preset_description(name),
        'demographics': document.get('demographics', {}).get('kind'),
        'zu0': document.get('preferences', {}).get('zu0'),
        'delta': document.get('preferences', {}).get('delta'),
        'omega_kind': document.get('preferences', {}).get('omega_kind', OmegaKind.EQUAL_WEIGHT.value),
    }
