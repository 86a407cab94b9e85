"""
Tests Package
"""
