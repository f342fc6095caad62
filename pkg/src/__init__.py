"""混合式 PAYG + 緩衝基金退休金模擬引擎"""

__version__ = "1.0.0"
