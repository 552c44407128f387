"""
evinc: каузальное решение неавтономных эволюционных включений
"""
__version__ = "0.1.0"
