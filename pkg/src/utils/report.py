#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
報告生成模組
將模擬結果輸出為可直接繪圖的 CSV/JSON 檔案，並計算執行清單的檢查碼

CSV：逗號分隔、小數點、LF 換行、UTF-8、含標題列，浮點數固定 17 位有效數字。
相同的執行清單保證輸出逐位元相同。
"""

import hashlib
import json
import math
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from ..core.config import config_manager
from ..models.enums import Conditioning
from ..models.results import ResultBundle, RunManifest, SweepResult
from ..utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)

SERIES_COLUMNS = ['time', 'mean', 'median', 'q25', 'q75', 'survival']
EAIR_COLUMNS = ['t', 'y_bf', 'y_min', 'delta', 'y_bf_solvent', 'y_bf_q25', 'y_bf_median', 'y_bf_q75']
HISTOGRAM_COLUMNS = ['bin_left', 'bin_right'] + [c.value for c in Conditioning]
PANEL_COLUMNS = ['label', 'value'] + EAIR_COLUMNS


def _json_safe(value: Any) -> Any:
    """NaN/inf 轉為 null，numpy 純量轉為 Python 型別"""
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _slug(text: str) -> str:
    return re.sub(r'[^A-Za-z0-9._=-]+', '_', text).strip('_') or 'point'


class ReportGenerator:
    """報告生成器"""

    def __init__(self, output_dir: Optional[str] = None):
        """初始化報告生成器"""
        output_config = config_manager.get_output_config()
        if output_dir is None:
            output_dir = output_config.get('directory', 'results/')
        self.output_dir = Path(output_dir)
        self.float_format = output_config.get('float_format', '%.17g')
        logger.debug(f"報告生成器初始化完成，輸出目錄: {self.output_dir}")

    # ------------------------------------------------------------------
    # 底層寫入
    # ------------------------------------------------------------------

    def _write_bytes(self, path: Path, data: bytes) -> str:
        """寫入檔案並回傳 SHA-256；I/O 錯誤附帶路徑"""
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, 'wb') as f:
                f.write(data)
        except OSError as e:
            logger.error(f"❌ 無法寫入 {path}: {e}")
            raise OSError(e.errno, f"cannot write output file: {e.strerror or e}", str(path)) from e
        return hashlib.sha256(data).hexdigest()

    def write_csv(self, frame: pd.DataFrame, path: Union[str, Path]) -> str:
        """以固定格式寫出 CSV，回傳檢查碼"""
        text = frame.to_csv(index=False, float_format=self.float_format, lineterminator='\n')
        return self._write_bytes(Path(path), text.encode('utf-8'))

    def write_json(self, payload: Dict[str, Any], path: Union[str, Path]) -> str:
        """以排序鍵寫出 JSON，回傳檢查碼"""
        text = json.dumps(_json_safe(payload), sort_keys=True, indent=2, ensure_ascii=False) + '\n'
        return self._write_bytes(Path(path), text.encode('utf-8'))

    # ------------------------------------------------------------------
    # 表格
    # ------------------------------------------------------------------

    @staticmethod
    def eair_frame(bundle: ResultBundle) -> pd.DataFrame:
        rows = [row.to_dict() for row in bundle.summary.eair_rows]
        return pd.DataFrame(rows, columns=EAIR_COLUMNS)

    @staticmethod
    def tau_frame(bundle: ResultBundle) -> pd.DataFrame:
        survival = np.asarray(bundle.summary.survival, dtype=float)
        return pd.DataFrame({'time': bundle.summary.times, 'survival': survival, 'cdf': 1.0 - survival})

    @staticmethod
    def summary_payload(bundle: ResultBundle) -> Dict[str, Any]:
        payload = bundle.summary.scalars()
        payload['label'] = bundle.label
        payload['config'] = bundle.config
        payload['manifest'] = bundle.manifest.to_dict()
        payload['final_means'] = {
            name: float(tables[Conditioning.UNCONDITIONAL.value]['mean'].iloc[-1])
            for name, tables in bundle.summary.series_stats.items()
        }
        return payload

    # ------------------------------------------------------------------
    # 結果輸出
    # ------------------------------------------------------------------

    def emit_results(self, bundle: ResultBundle, out_dir: Optional[Union[str, Path]] = None) -> Dict[str, Path]:
        """
        輸出單次執行的完整檔案組

        Args:
            bundle: 執行結果
            out_dir: 輸出目錄（預設為配置中的 output.directory）

        Returns:
            檔名 → 路徑
        """
        out = Path(out_dir) if out_dir is not None else self.output_dir
        checksums: Dict[str, str] = {}
        written: Dict[str, Path] = {}

        def emit_csv(name: str, frame: pd.DataFrame):
            path = out / name
            checksums[name] = self.write_csv(frame, path)
            written[name] = path

        summary = bundle.summary
        for series, tables in summary.series_stats.items():
            for conditioning in Conditioning:
                suffix = '' if conditioning is Conditioning.UNCONDITIONAL else f"_{conditioning.value}"
                frame = summary.series_table(series, conditioning.value).reset_index()
                emit_csv(f"series_{series}{suffix}.csv", frame[SERIES_COLUMNS])

        emit_csv('tau_distribution.csv', self.tau_frame(bundle))
        emit_csv('eair_table.csv', self.eair_frame(bundle))
        for name, table in summary.histograms.items():
            emit_csv(f"histogram_{name}.csv", table[[c for c in HISTOGRAM_COLUMNS if c in table.columns]])
        if bundle.path_dump is not None:
            emit_csv('paths.csv', bundle.path_dump)

        bundle.manifest.checksums = dict(checksums)
        checksums['summary.json'] = self.write_json(self.summary_payload(bundle), out / 'summary.json')
        written['summary.json'] = out / 'summary.json'

        manifest = bundle.manifest.to_dict()
        manifest['checksums'] = dict(sorted(checksums.items()))
        self.write_json(manifest, out / 'manifest.json')
        written['manifest.json'] = out / 'manifest.json'
        bundle.manifest.checksums = dict(checksums)

        logger.info(f"📁 已輸出 {len(written)} 個檔案至 {out}")
        return written

    def emit_sweep_results(self, result: SweepResult, out_dir: Optional[Union[str, Path]] = None) -> Dict[str, Path]:
        """
        輸出掃描結果：每點一個子目錄，加上 sweep_summary.csv、eair_panel.csv 與 manifest.json

        沒有任何掃描點時只輸出表頭與執行清單。
        """
        out = Path(out_dir) if out_dir is not None else self.output_dir
        checksums: Dict[str, str] = {}
        written: Dict[str, Path] = {}

        table = result.table()
        panel_rows: List[Dict[str, Any]] = []
        for i, bundle in enumerate(result.bundles):
            point_dir = out / f"{i:02d}_{_slug(bundle.label)}"
            self.emit_results(bundle, point_dir)
            checksums[f"{point_dir.name}/manifest"] = hashlib.sha256(
                json.dumps(_json_safe(bundle.manifest.to_dict()), sort_keys=True).encode('utf-8')
            ).hexdigest()
            for row in bundle.summary.eair_rows:
                panel_rows.append({'label': bundle.label, 'value': table['value'].iloc[i],
                                   **row.to_dict()})

        for name, frame in (('sweep_summary.csv', table),
                            ('eair_panel.csv', pd.DataFrame(panel_rows, columns=PANEL_COLUMNS))):
            checksums[name] = self.write_csv(frame, out / name)
            written[name] = out / name

        manifest = result.manifest.to_dict()
        manifest['parameter'] = result.parameter
        manifest['points'] = [str(v) for v in table['value']]
        manifest['checksums'] = dict(sorted(checksums.items()))
        self.write_json(manifest, out / 'manifest.json')
        written['manifest.json'] = out / 'manifest.json'
        result.manifest.checksums = dict(checksums)

        logger.info(f"📁 掃描結果已輸出至 {out}（{len(result.bundles)} 個掃描點）")
        return written

    def emit_single_path(self, frame: pd.DataFrame, meta: Dict[str, Any],
                         out_dir: Optional[Union[str, Path]] = None) -> Dict[str, Path]:
        """單一路徑完整時間序列（simulate 指令）"""
        out = Path(out_dir) if out_dir is not None else self.output_dir
        checksums = {'path.csv': self.write_csv(frame, out / 'path.csv')}
        payload = dict(meta)
        payload['checksums'] = checksums
        self.write_json(payload, out / 'manifest.json')
        logger.info(f"📁 單一路徑已輸出至 {out / 'path.csv'}")
        return {'path.csv': out / 'path.csv', 'manifest.json': out / 'manifest.json'}


def read_manifest(path: Union[str, Path]) -> RunManifest:
    """讀回執行清單（比對兩次執行是否一致）"""
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    fields = {k: data[k] for k in ('config_hash', 'master_seed', 'n_paths', 'grid', 'engine_version',
                                   'chunk_size', 'error_policy', 'failed_paths', 'checksums') if k in data}
    return RunManifest(**fields)
