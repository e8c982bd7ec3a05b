pre m(U,T) | list(T).
pre in(U,T) | list(U), list(T), ground(U), ground(T).
post m(E,L) | member(E,L).
post in(U,T) | list(U), list(T), ground(U), ground(T), subset(U,T).
