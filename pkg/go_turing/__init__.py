"""
go_turing
바둑 기보 → 3×3 패턴 네트워크 → 구글 행렬 스펙트럼 → 네트워크 튜링 테스트
"""

__version__ = "1.0.0"
