"""
Модуль сервисов содержит вычислительную логику приложения.

Основные сервисы:
- initial_data_service: семейства начальных данных, разложение Био-Савара, условия малости
- solver_service: интегрирование (ANS) и послойной двумерной системы Навье-Стокса
- decomposition_service: разложение u = (ū^h, 0) + v и мониторинг каналов
- verifier_service: проверочные наборы и профилирование констант
"""
