"""
Aniso NS - псевдоспектральный решатель анизотропных уравнений Навье-Стокса
с горизонтальной вязкостью и анизотропный инструментарий Литтлвуда-Пэли.

Основные компоненты:
- spectral: сетки, спектральные поля, производные, проектор Лерэ
- littlewood_paley: диадические срезки и анизотропные блоки
- norms: анизотропные нормы Бесова и норм-журнал
- services: начальные данные, решатели, декомпозиция, верификация
- commands: пакетный интерфейс экспериментов
"""

__version__ = "0.1.0"
__author__ = "Aniso NS Team"
__description__ = "Решатель анизотропных уравнений Навье-Стокса и анизотропный анализ Литтлвуда-Пэли"
