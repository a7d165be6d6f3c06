"""Polynomial core: root-form arithmetic, resultants, the multiplier J and its exact expansion."""
