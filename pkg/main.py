#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
退休金模擬系統主程式
混合式 PAYG + 緩衝基金的蒙地卡羅模擬入口點

用法範例:
    python main.py presets
    python main.py validate table1_base
    python main.py calibrate-zu0 --preset table1_base --target 0.05
    python main.py montecarlo --preset table1_bb --paths 10000 --seed 42
"""

import sys
import os

# 添加專案根目錄到Python路徑
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli import cli_dispatch


def main() -> int:
    """主程式"""
    try:
        return cli_dispatch(sys.argv[1:])
    except KeyboardInterrupt:
        print("\n👋 程式已中斷", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
