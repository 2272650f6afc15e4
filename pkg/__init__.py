"""
IRS Radcom - Joint Active and Passive Beamforming for IRS-Aided Radar-Communication

Designs the base-station transmit beamformers and the IRS phase shifts that
minimize transmit power while every user meets its SINR threshold and the
radar meets its detection SINR (and, optionally, a cross-correlation limit):
- Case I (IRS loop cancelled at the radar): two-layer penalty algorithm
- Case II (loop interference, cross-correlation): SDR alternating optimization
  with rank-one reconstruction
"""

__version__ = "0.1.0"
__author__ = "IRS Radcom Team"
