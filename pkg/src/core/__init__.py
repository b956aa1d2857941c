"""Core modules for glupoly"""
