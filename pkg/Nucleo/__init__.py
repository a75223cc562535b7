"""Núcleo de análisis de FugaBox"""
