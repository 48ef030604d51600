"""
Пакетный интерфейс экспериментов: модели конфигурации и исполнитель команд.
"""
