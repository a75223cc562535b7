"""Paquete de FugaBox"""
