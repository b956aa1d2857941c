"""CLI modules for glupoly"""
