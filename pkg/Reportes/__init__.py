"""Reportes de FugaBox"""
