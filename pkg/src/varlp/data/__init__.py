"""Packaged data files (frozen calibration fixtures)."""
