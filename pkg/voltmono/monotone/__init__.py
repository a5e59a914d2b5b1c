# coding=utf-8
"""
单调性分析模块 - 符号模式、单调判据、Gershgorin 证书、轨迹序关系与 Υ′ 扫描
"""

from voltmono.monotone.sign import (
    SignMatrix,
    sign_pattern,
    template_match_fraction,
    template_matches,
    template_mismatches,
    voltage_template,
)
from voltmono.monotone.theorem import (
    MonotoneVerdict,
    Regime,
    RegimeReport,
    Verdict,
    check_theorem1,
    classify_regime,
)
from voltmono.monotone.gershgorin import GershgorinCertificate, gershgorin_certificate
from voltmono.monotone.ordering import OrderingReport, VariationReport, ordering_check, variation_positivity
from voltmono.monotone.upsilon import UpsilonScan, upsilon_scan

__all__ = [
    "SignMatrix",
    "sign_pattern",
    "template_match_fraction",
    "template_matches",
    "template_mismatches",
    "voltage_template",
    "MonotoneVerdict",
    "Regime",
    "RegimeReport",
    "Verdict",
    "check_theorem1",
    "classify_regime",
    "GershgorinCertificate",
    "gershgorin_certificate",
    "OrderingReport",
    "VariationReport",
    "ordering_check",
    "variation_positivity",
    "UpsilonScan",
    "upsilon_scan",
]
