#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
退休金模擬器
統一管理單一路徑管線、蒙地卡羅執行、參數掃描與 Z^u_0 校準的核心協調器
"""

from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from . import __version__
from .core.concurrent_optimizer import ConcurrentOptimizer, Task
from .core.config import config_manager
from .core.market import simulate_market_path
from .core.policy import euler_fund_crosscheck, optimal_policy_path, pure_investment_wealth
from .core.preferences import build_preference_path, check_divergence, crosscheck_gap, zu_sde_form
from .core.random_streams import batch_normals, path_normals
from .core.scenario_loader import config_hash, serialize_config
from .demographics import create_schedule
from .models.enums import Conditioning, ErrorPolicy, PresetPath, SweepParameter
from .models.errors import ConfigValidationError, PathSimulationError, PensionSimError
from .models.params import ScenarioConfig, TimeGrid
from .models.paths import MarketPath, PolicyPath, PreferencePath
from .models.results import ResultBundle, RunManifest, SummaryStats, SweepResult, SweepSpec
from .utils import metrics
from .utils.logger import setup_logger

# 建立日誌器
logger = setup_logger(__name__)

# 報告網格上追蹤的序列（CSV 檔名即序列名稱）
SERIES_NAMES = (
    'p_star', 'p_min', 'pension_surplus', 'relative_surplus',
    'benefit_ratio', 'benefit_ratio_min', 'benefit_ratio_increase',
    'fund', 'surplus_fund', 'sustainability_bound', 'risky_fraction', 'pi_star', 'zu_ratio',
    'wage', 'equity', 'variance', 'short_rate', 'pure_investment',
)
HISTOGRAM_SERIES = ('p_star', 'p_min', 'relative_surplus', 'benefit_ratio')

# 判定路徑失敗的必要序列
_REQUIRED_FINITE = ('p_star', 'p_min', 'fund', 'surplus_fund', 'wage')

PipelineResult = Tuple[MarketPath, PreferencePath, PolicyPath]


@dataclass(frozen=True)
class ReportSpec:
    """報告網格：序列取樣點、EAIR 年度取樣點與存活門檻"""
    time_indices: Tuple[int, ...]
    times: Tuple[float, ...]
    annual_indices: Tuple[int, ...]
    eair_times: Tuple[float, ...]
    solvency_threshold: float = 1e-9
    error_policy: ErrorPolicy = ErrorPolicy.FAIL_FAST

    @classmethod
    def from_config(cls, grid: TimeGrid, reporting: Dict[str, Any],
                    error_policy: ErrorPolicy = ErrorPolicy.FAIL_FAST) -> 'ReportSpec':
        step = float(reporting.get('series_step_years', 1.0))
        if not step > 0:
            raise ConfigValidationError("series step must be > 0", key='reporting.series_step_years')
        n_report = int(np.floor(grid.horizon_years / step + 1e-9))
        times = [k * step for k in range(n_report + 1)]
        try:
            indices = [grid.index_of(t) for t in times]
        except ValueError as e:
            raise ConfigValidationError(str(e), key='reporting.series_step_years') from None

        eair_times = []
        for t in reporting.get('eair_times', []) or []:
            year = int(round(float(t)))
            if 1 <= year <= grid.horizon_years:
                eair_times.append(float(year))
            else:
                logger.warning(f"⚠️ EAIR 時間 {t} 超出模擬範圍，略過")
        max_year = int(max(eair_times)) if eair_times else 0
        annual = [grid.index_of(float(y)) for y in range(max_year + 1)] if eair_times else []
        return cls(time_indices=tuple(indices), times=tuple(grid.times()[indices]),
                   annual_indices=tuple(annual), eair_times=tuple(eair_times),
                   solvency_threshold=float(reporting.get('solvency_threshold', 1e-9)),
                   error_policy=error_policy)


# ---------------------------------------------------------------------------
# 單一路徑／批次管線
# ---------------------------------------------------------------------------

def run_pipeline(config: ScenarioConfig, normals: np.ndarray) -> PipelineResult:
    """市場 → 偏好 → 政策"""
    market = simulate_market_path(config.market, config.grid, config.correlation.chol, normals)
    pref_path = build_preference_path(market, config.demo, config.prefs, config.loadings, config.grid)
    policy = optimal_policy_path(market, pref_path, config.demo, config.pension, config.prefs,
                                 config.loadings, config.grid, config.f0)
    return market, pref_path, policy


def run_single_path(config: ScenarioConfig, path_index: int) -> PipelineResult:
    """第 path_index 條路徑的完整管線（一維陣列）"""
    if path_index < 0:
        raise ValueError("path index must be >= 0")
    normals = path_normals(config.master_seed, path_index, config.grid.n_steps)
    return run_pipeline(config, normals)


def simulate_batch(config: ScenarioConfig, path_indices: Sequence[int]) -> PipelineResult:
    """多條路徑一起向量化計算，第二軸依 path_indices 排列"""
    normals = batch_normals(config.master_seed, path_indices, config.grid.n_steps)
    return run_pipeline(config, normals)


def sample_series(config: ScenarioConfig, market: MarketPath, pref_path: PreferencePath,
                  policy: PolicyPath, indices: Sequence[int]) -> Dict[str, np.ndarray]:
    """在指定網格索引上取出所有追蹤序列"""
    idx = np.asarray(indices, dtype=int)
    wealth = pure_investment_wealth(market, config.prefs, config.loadings,
                                    config.f0 - config.pension.k0, config.grid.dt)
    p_star = policy.p_star[idx]
    p_min = policy.p_min[idx]
    wage = market.wage[idx]
    br = metrics.benefit_ratio(p_star, wage)
    br_min = metrics.benefit_ratio(p_min, wage)
    return {
        'p_star': p_star,
        'p_min': p_min,
        'pension_surplus': policy.pension_surplus[idx],
        'relative_surplus': metrics.relative_surplus(p_star, p_min),
        'benefit_ratio': br,
        'benefit_ratio_min': br_min,
        'benefit_ratio_increase': br - br_min,
        'fund': policy.fund[idx],
        'surplus_fund': policy.surplus_fund[idx],
        'sustainability_bound': policy.k_bound[idx],
        'risky_fraction': policy.risky_fraction[idx],
        'pi_star': policy.pi_star[idx],
        'zu_ratio': pref_path.zu[idx] / config.prefs.zu0,
        'wage': wage,
        'equity': market.s[idx],
        'variance': market.nu[idx],
        'short_rate': market.r[idx],
        'pure_investment': wealth[idx],
    }


def _chunk_samples(config: ScenarioConfig, path_indices: List[int], spec: ReportSpec) -> Dict[str, Any]:
    market, pref_path, policy = simulate_batch(config, path_indices)
    series = sample_series(config, market, pref_path, policy, spec.time_indices)
    annual = list(spec.annual_indices)
    return {
        'indices': np.asarray(path_indices, dtype=int),
        'series': series,
        'solvent': series['surplus_fund'] > spec.solvency_threshold * (config.f0 - config.pension.k0),
        'tau': np.asarray(pref_path.tau, dtype=float),
        'annual_p_star': policy.p_star[annual],
        'annual_p_min': policy.p_min[annual],
    }


def _bad_columns(chunk: Dict[str, Any]) -> np.ndarray:
    bad = np.zeros(chunk['indices'].size, dtype=bool)
    for name in _REQUIRED_FINITE:
        bad |= ~np.isfinite(chunk['series'][name]).all(axis=0)
    bad |= np.isnan(chunk['tau'])
    if chunk['annual_p_star'].size:
        bad |= ~(np.isfinite(chunk['annual_p_star']) & (chunk['annual_p_star'] > 0)).all(axis=0)
    return bad


def _select_columns(chunk: Dict[str, Any], keep: np.ndarray) -> Dict[str, Any]:
    return {
        'indices': chunk['indices'][keep],
        'series': {name: values[:, keep] for name, values in chunk['series'].items()},
        'solvent': chunk['solvent'][:, keep],
        'tau': chunk['tau'][keep],
        'annual_p_star': chunk['annual_p_star'][:, keep],
        'annual_p_min': chunk['annual_p_min'][:, keep],
    }


def _concat_chunks(chunks: List[Dict[str, Any]]) -> Dict[str, Any]:
    """依區塊順序合併（路徑軸為第二軸，tau 與索引為第一軸）"""
    merged = {
        'indices': np.concatenate([c['indices'] for c in chunks]),
        'series': {name: np.concatenate([c['series'][name] for c in chunks], axis=1)
                   for name in chunks[0]['series']},
        'tau': np.concatenate([c['tau'] for c in chunks]),
    }
    for key in ('solvent', 'annual_p_star', 'annual_p_min', 'y_bf', 'y_min'):
        if key in chunks[0]:
            merged[key] = np.concatenate([c[key] for c in chunks], axis=1)
    return merged


def _handle_failure(path_index: int, reason: str, spec: ReportSpec, cause: Optional[BaseException] = None):
    if spec.error_policy is ErrorPolicy.FAIL_FAST:
        raise PathSimulationError(path_index, reason) from cause
    logger.error(f"❌ 路徑 {path_index} 失敗，已略過: {reason}")


def simulate_chunk(config: ScenarioConfig, path_indices: Sequence[int], spec: ReportSpec) -> Dict[str, Any]:
    """
    蒙地卡羅工作單元：一個區塊的路徑

    批次計算失敗時逐路徑重算以定位失敗路徑；fail_fast 下拋出帶路徑編號的錯誤，
    skip_and_report 下略過並回報。

    Returns:
        取樣後的序列、存活遮罩、τ、逐路徑 EAIR 與失敗路徑清單
    """
    path_indices = [int(k) for k in path_indices]
    failed: List[int] = []
    try:
        chunk = _chunk_samples(config, path_indices, spec)
        parts = [chunk]
    except PensionSimError as e:
        logger.warning(f"⚠️ 區塊 {path_indices[0]}–{path_indices[-1]} 計算失敗，改為逐路徑重算: {e}")
        parts = []
        for k in path_indices:
            try:
                parts.append(_chunk_samples(config, [k], spec))
            except PensionSimError as path_error:
                _handle_failure(k, str(path_error), spec, path_error)
                failed.append(k)

    kept = []
    for part in parts:
        bad = _bad_columns(part)
        for k in part['indices'][bad]:
            _handle_failure(int(k), "non-finite pension or fund values", spec)
            failed.append(int(k))
        if (~bad).any():
            kept.append(_select_columns(part, ~bad) if bad.any() else part)

    if not kept:
        return {'indices': np.zeros(0, dtype=int), 'failed': sorted(failed)}

    result = _concat_chunks(kept)
    if spec.eair_times:
        # y^BF 以純 PAYG 的初始年金 p_min,0 為基準
        result['y_bf'] = metrics.eair_yields(result['annual_p_star'], spec.eair_times,
                                              base=result['annual_p_min'][0])
        result['y_min'] = metrics.eair_yields(result['annual_p_min'], spec.eair_times)
    else:
        n = result['indices'].size
        result['y_bf'] = np.zeros((0, n))
        result['y_min'] = np.zeros((0, n))
    del result['annual_p_star'], result['annual_p_min']
    result['failed'] = sorted(failed)
    return result


# ---------------------------------------------------------------------------
# 情境修改與校準
# ---------------------------------------------------------------------------

def calibrate_zu0(config: ScenarioConfig, target: float) -> float:
    """
    以初始相對盈餘目標校準 Z^u_0

    (Z^u_0/Z_0)^{1/θ} = (F_0 − 𝔎_0)/(ρ_0·p_min,0) ⇒ Z^u_0 = Z_0·((F_0 − 𝔎_0)/(ρ_0·p_min,0))^θ

    Raises:
        ConfigValidationError: target ≤ 0（Z^u_0 無界）
    """
    if not target > 0:
        raise ConfigValidationError("target initial relative surplus must be > 0", key='target')
    ratio = (config.f0 - config.pension.k0) / config.p_min0 / target
    return float(config.prefs.z0 * ratio ** config.prefs.theta)


def resolve_f0(value: Union[float, str], config: ScenarioConfig) -> float:
    """F_0 可為金額或 C_0 的倍數（例如 '1.5c0'）"""
    if isinstance(value, str):
        text = value.strip().lower()
        try:
            if text.endswith('c0'):
                factor = text[:-2].rstrip('*').strip()
                return (float(factor) if factor else 1.0) * config.c0
            return float(text)
        except ValueError:
            raise ConfigValidationError(f"invalid f0 value '{value}'", key='sweep.values') from None
    return float(value)


def _resolve_schedule(value: Any):
    if isinstance(value, dict):
        return create_schedule(value)
    name = str(value)
    preset = config_manager.get_preset(name)
    if preset is not None:
        return create_schedule(preset['demographics'])
    return create_schedule({'kind': name})


def apply_sweep_value(base: ScenarioConfig, parameter: SweepParameter, value: Any) -> ScenarioConfig:
    """只修改 base 的一個欄位，回傳新的（重新驗證過的）配置"""
    prefs = base.prefs
    if parameter is SweepParameter.ZU0:
        return base.with_updates(prefs=replace(prefs, zu0=float(value)))
    if parameter is SweepParameter.THETA:
        return base.with_updates(prefs=replace(prefs, theta=float(value)))
    if parameter is SweepParameter.F0:
        return base.with_updates(f0=resolve_f0(value, base))
    if parameter is SweepParameter.LAMBDA:
        return base.with_updates(market=replace(base.market, wage_drift=float(value)))
    if parameter is SweepParameter.DELTA_VECTOR:
        if isinstance(value, str):
            value = [float(v) for v in value.replace(',', ' ').split()]
        return base.with_updates(prefs=replace(prefs, delta=tuple(float(v) for v in value)))
    if parameter is SweepParameter.OMEGA_KIND:
        return base.with_updates(prefs=replace(prefs, omega_kind=value))
    if parameter is SweepParameter.DEMOGRAPHIC_KIND:
        return base.with_updates(demo=_resolve_schedule(value))
    raise ConfigValidationError(f"unsupported sweep parameter '{parameter}'", key='sweep.parameter')


def recalibrate_for_theta(config: ScenarioConfig, target: float) -> ScenarioConfig:
    """θ 掃描：Z_0 = (1/N^w_0)^θ，並以相同初始盈餘目標重新校準 Z^u_0"""
    theta = config.prefs.theta
    z0 = (1.0 / config.demo.n_workers(0.0)) ** theta
    rescaled = config.with_updates(prefs=replace(config.prefs, z0=z0))
    zu0 = calibrate_zu0(rescaled, target)
    return rescaled.with_updates(prefs=replace(rescaled.prefs, zu0=zu0))


def select_preset_path(config: ScenarioConfig, which: PresetPath, ranking_paths: int = 100) -> int:
    """
    具名單一路徑的選取規則

    以前 ranking_paths 條路徑的純投資組合期末財富排序：
    樂觀 = 第 round(0.9·(n−1)) 名，悲觀 = 第 round(0.1·(n−1)) 名（由小到大）。
    """
    if ranking_paths < 1:
        raise ValueError("ranking_paths must be >= 1")
    indices = list(range(ranking_paths))
    normals = batch_normals(config.master_seed, indices, config.grid.n_steps)
    market = simulate_market_path(config.market, config.grid, config.correlation.chol, normals)
    terminal = pure_investment_wealth(market, config.prefs, config.loadings,
                                      config.f0 - config.pension.k0, config.grid.dt)[-1]
    order = np.argsort(terminal, kind='stable')
    quantile = 0.9 if which is PresetPath.OPTIMISTIC else 0.1
    chosen = int(order[int(round(quantile * (ranking_paths - 1)))])
    logger.info(f"🎯 {which.value} 路徑 = #{chosen}（純投資期末財富 {terminal[chosen]:.4g}）")
    return chosen


def single_path_frame(config: ScenarioConfig, path_index: int) -> pd.DataFrame:
    """單一路徑在完整網格上的市場、偏好與政策序列"""
    market, pref_path, policy = run_single_path(config, path_index)
    all_points = list(range(config.grid.n_points))
    series = sample_series(config, market, pref_path, policy, all_points)
    frame = pd.DataFrame({'time': market.times})
    for name in SERIES_NAMES:
        frame[name] = series[name]
    frame['eta'] = market.eta
    frame['phi_star'] = policy.phi_star
    frame['xi'] = pref_path.xi
    frame['zu'] = pref_path.zu
    frame['depletion_integral'] = pref_path.depletion_integral
    frame['n_retirees'] = pref_path.n_retirees
    frame['omega'] = pref_path.omega
    frame['depleted'] = pref_path.depleted.astype(int)
    return frame


# ---------------------------------------------------------------------------
# 協調器
# ---------------------------------------------------------------------------

class PensionSimulator:
    """退休金模擬器 - 統一管理蒙地卡羅執行、掃描與校準"""

    def __init__(self, max_workers: Optional[int] = None, error_policy: Optional[str] = None):
        """初始化模擬器"""
        self.harness = config_manager.get_harness_config()
        self.reporting = config_manager.get_reporting_config()
        self.crosscheck_config = config_manager.get_crosscheck_config()

        # 工作數：參數優先，但仍受環境變數上限約束
        cap = self.harness.get('max_workers')
        if max_workers is not None:
            max_workers = max(int(max_workers), 1)
            cap = max_workers if cap is None else min(max_workers, int(cap))
        self.optimizer = ConcurrentOptimizer(max_workers=cap)

        self.chunk_size = int(self.harness.get('chunk_size', 128))
        if self.chunk_size < 1:
            raise ConfigValidationError("chunk_size must be >= 1", key='harness.chunk_size')
        try:
            self.error_policy = ErrorPolicy(error_policy or self.harness.get('error_policy', 'fail_fast'))
        except ValueError:
            raise ConfigValidationError(f"unknown error policy '{error_policy}'",
                                        key='harness.error_policy') from None

        logger.info("退休金模擬器初始化完成")

    def report_spec(self, config: ScenarioConfig) -> ReportSpec:
        return ReportSpec.from_config(config.grid, self.reporting, self.error_policy)

    def run_scenario(self, config: ScenarioConfig, write_paths: bool = False,
                     label: str = 'run') -> ResultBundle:
        """
        蒙地卡羅執行

        路徑依編號切成固定大小的區塊，每個區塊是一個任務；結果依區塊順序合併，
        與工作數及完成順序無關。
        """
        logger.info(f"🔄 開始蒙地卡羅模擬: {label}")
        logger.info("=" * 60)
        logger.info(f"📋 {config.summary()}")

        spec = self.report_spec(config)
        n = config.n_paths
        chunks = [list(range(start, min(start + self.chunk_size, n)))
                  for start in range(0, n, self.chunk_size)]
        tasks = [Task(id=f"chunk-{i}", func=simulate_chunk, args=(config, chunk, spec))
                 for i, chunk in enumerate(chunks)]
        fail_fast = self.error_policy is ErrorPolicy.FAIL_FAST
        results = self.optimizer.execute_batch(tasks, fail_fast=fail_fast)

        parts, failed = [], []
        for chunk, task_result in zip(chunks, results):
            if not task_result.success:
                logger.error(f"❌ {task_result.task_id} 整個區塊失敗: {task_result.error}")
                failed.extend(chunk)
                continue
            output = task_result.result
            failed.extend(output['failed'])
            if output['indices'].size:
                parts.append(output)
            logger.debug(f"{task_result.task_id} 完成 ({output['indices'].size} 條路徑)")

        if not parts:
            raise PensionSimError("all simulated paths failed")
        if failed:
            logger.warning(f"⚠️ {len(failed)} 條路徑失敗並已略過")
        logger.debug(f"並發統計: {self.optimizer.get_stats()}")

        merged = _concat_chunks(parts)
        summary = self._summarize(config, merged, spec)
        manifest = RunManifest(
            config_hash=config_hash(config),
            master_seed=config.master_seed,
            n_paths=config.n_paths,
            grid={'horizon_years': config.grid.horizon_years,
                  'steps_per_year': config.grid.steps_per_year,
                  'n_steps': config.grid.n_steps},
            engine_version=__version__,
            chunk_size=self.chunk_size,
            error_policy=self.error_policy.value,
            failed_paths=sorted(failed),
        )
        path_dump = self._path_dump(merged, spec) if write_paths else None

        tau = summary.tau_moments
        logger.info(f"✅ 完成 {summary.n_paths} 條路徑；平均 τ = {tau['mean']:.2f} 年，"
                    f"截斷比例 {tau['censored_fraction']:.1%}")
        return ResultBundle(summary=summary, manifest=manifest, config=serialize_config(config),
                            path_dump=path_dump, label=label)

    def _summarize(self, config: ScenarioConfig, merged: Dict[str, Any], spec: ReportSpec) -> SummaryStats:
        times = np.asarray(spec.times)
        samples = merged['series']
        solvent = merged['solvent']
        tau = merged['tau']

        histograms = {}
        bins = self.reporting.get('histogram_bins', 'fd')
        bin_width = self.reporting.get('histogram_bin_width')
        for t in self.reporting.get('histogram_times', []) or []:
            hit = np.flatnonzero(np.isclose(times, float(t)))
            if hit.size == 0:
                logger.warning(f"⚠️ 直方圖時間 {t} 不在報告網格上，略過")
                continue
            i = int(hit[0])
            masks = {Conditioning.SOLVENT.value: solvent[i], Conditioning.DEPLETED.value: ~solvent[i]}
            for name in HISTOGRAM_SERIES:
                histograms[f"{name}_t{float(t):g}"] = metrics.histogram(samples[name][i], masks,
                                                                         bins=bins, bin_width=bin_width)

        standardized = {'initial_relative_surplus': float(np.mean(samples['relative_surplus'][0]))}
        t_std = float(self.reporting.get('standardized_time', 30))
        hit = np.flatnonzero(np.isclose(times, t_std))
        if hit.size:
            i = int(hit[0])
            standardized.update(metrics.standardized_pensions(samples['p_star'][i], samples['p_min'][i],
                                                              config.p_min0, tau, t_std))
        else:
            logger.debug(f"標準化年金時間 {t_std} 不在報告網格上")

        return SummaryStats(
            times=times,
            series_stats=metrics.conditional_stats(samples, solvent, times),
            survival=metrics.survival_curve(tau, times),
            tau_moments=metrics.tau_moments(tau, config.grid.horizon_years),
            eair_rows=metrics.eair_table(merged['y_bf'], merged['y_min'], tau, spec.eair_times),
            histograms=histograms,
            standardized=standardized,
            n_paths=int(merged['indices'].size),
        )

    @staticmethod
    def _path_dump(merged: Dict[str, Any], spec: ReportSpec) -> pd.DataFrame:
        """逐路徑輸出（長表格：path, time, 各序列）"""
        indices = merged['indices']
        n_times = len(spec.times)
        frame = pd.DataFrame({'path': np.tile(indices, n_times),
                              'time': np.repeat(np.asarray(spec.times), indices.size)})
        for name in SERIES_NAMES:
            frame[name] = merged['series'][name].ravel()
        frame['tau'] = np.tile(merged['tau'], n_times)
        return frame.sort_values(['path', 'time'], kind='stable').reset_index(drop=True)

    def run_sweep(self, spec: SweepSpec, write_paths: bool = False) -> SweepResult:
        """
        參數掃描

        shared_seed=True 時所有掃描點使用相同的亂數串流（共同隨機數）；
        否則第 i 點使用 master_seed + i。
        """
        logger.info(f"🔄 開始參數掃描: {spec.parameter.value}（{len(spec.values)} 點）")
        logger.info("=" * 60)
        bundles = []
        for i, value in enumerate(spec.values):
            config = self.sweep_point(spec, i)
            label = f"{spec.parameter.value}={_label_value(value)}"
            bundles.append(self.run_scenario(config, write_paths=write_paths, label=label))
        return SweepResult(parameter=spec.parameter.value, points=list(spec.values), bundles=bundles,
                           manifest=self.sweep_manifest(spec.base))

    def sweep_point(self, spec: SweepSpec, i: int) -> ScenarioConfig:
        """第 i 個掃描點的配置"""
        config = apply_sweep_value(spec.base, spec.parameter, spec.values[i])
        if spec.parameter is SweepParameter.THETA and spec.recalibrate_target is not None:
            config = recalibrate_for_theta(config, spec.recalibrate_target)
            logger.info(f"θ = {config.prefs.theta:g}：Z_0 = {config.prefs.z0:.6g}，"
                        f"Z^u_0 = {config.prefs.zu0:.6g}")
        if not spec.shared_seed:
            config = config.with_updates(master_seed=spec.base.master_seed + i)
        return config

    def run_grid(self, base: ScenarioConfig, f0_values: Sequence[Union[float, str]],
                 lambda_values: Sequence[float]) -> SweepResult:
        """F_0 × λ 網格（共同隨機數），每點為 (λ, F_0)"""
        logger.info(f"🔄 開始 F0 × λ 網格: {len(lambda_values)} × {len(f0_values)}")
        points, bundles = [], []
        for lam in lambda_values:
            for f0 in f0_values:
                config = apply_sweep_value(apply_sweep_value(base, SweepParameter.LAMBDA, lam),
                                           SweepParameter.F0, f0)
                point = (float(lam), float(config.f0))
                points.append(point)
                bundles.append(self.run_scenario(config, label=f"lambda={lam:g},f0={config.f0:g}"))
        return SweepResult(parameter='lambda,f0', points=points, bundles=bundles,
                           manifest=self.sweep_manifest(base))

    def sweep_manifest(self, base: ScenarioConfig) -> RunManifest:
        return RunManifest(
            config_hash=config_hash(base),
            master_seed=base.master_seed,
            n_paths=base.n_paths,
            grid={'horizon_years': base.grid.horizon_years,
                  'steps_per_year': base.grid.steps_per_year,
                  'n_steps': base.grid.n_steps},
            engine_version=__version__,
            chunk_size=self.chunk_size,
            error_policy=self.error_policy.value,
        )

    def crosscheck(self, config: ScenarioConfig, path_indices: Sequence[int],
                   strict: bool = True) -> Dict[str, float]:
        """
        SDE 交叉驗證：Z^u 的 SDE 與封閉式、基金 SDE 與封閉式 G

        Raises:
            DivergenceError: strict 且任一差距超出容許值
        """
        tolerance = float(self.crosscheck_config.get('tolerance', 0.01))
        window = float(self.crosscheck_config.get('window_fraction', 0.9))
        cutoff = float(self.crosscheck_config.get('zu_cutoff', 1e-12))

        market, pref_path, policy = simulate_batch(config, list(path_indices))
        zu_sde = zu_sde_form(market, pref_path.n_retirees, pref_path.z, pref_path.omega,
                             config.prefs, config.loadings, config.grid, cutoff)
        fund_sde = euler_fund_crosscheck(market, pref_path, config.pension, config.prefs,
                                         config.loadings, config.grid, config.f0)
        pairs = {
            'zu': (pref_path.zu, zu_sde),
            'fund': (policy.surplus_fund, fund_sde - policy.k_bound),
        }
        gaps = {}
        for name, (reference, candidate) in pairs.items():
            if strict:
                gaps[name] = check_divergence(reference, candidate, pref_path.tau_index, tolerance, window)
            else:
                gaps[name] = crosscheck_gap(reference, candidate, pref_path.tau_index, window)[0]
        logger.info(f"🔍 交叉驗證最大相對差距: Z^u {gaps['zu']:.3e}，基金 {gaps['fund']:.3e}")
        return gaps


def _label_value(value: Any) -> str:
    if isinstance(value, dict):
        return str(value.get('kind', 'custom'))
    if isinstance(value, (list, tuple)):
        return ','.join(f"{float(v):g}" for v in value)
    if hasattr(value, 'value'):
        return str(value.value)
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)
