"""
Sistema de Geração de Relatórios
Responsável por gerar relatórios TSV (pandas) e o log JSONL dos ciclos de adaptação
"""
