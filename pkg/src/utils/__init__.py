"""Utility modules for glupoly"""
