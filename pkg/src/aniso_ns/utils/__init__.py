"""
Вспомогательные функции: файлы полей AFLD1, JSON-артефакты, хэши.
"""
