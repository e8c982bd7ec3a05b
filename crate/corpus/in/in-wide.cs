% As in.cs, but the first argument of in/2 may be non-ground.
pre m(U,T) | list(T).
pre in(U,T) | list(U), ground(T).
post m(E,L) | member(E,L).
post in(U,T) | list(U), list(T), ground(U), ground(T), subset(U,T).
