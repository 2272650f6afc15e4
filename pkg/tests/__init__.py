"""
IRS Radcom Test Suite
"""
